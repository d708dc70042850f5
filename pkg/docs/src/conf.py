# Configuration file for the Sphinx documentation builder.
#
# Only the settings the EDP-OCS documentation uses are set here; see
# http://www.sphinx-doc.org/en/master/config for the full list.

import os
import sys

sys.path.insert(0, os.path.abspath(os.path.join("..", "..", "src")))

autodoc_mock_imports = [
    "numpy",
    "scipy",
    "schema",
    "ska_ser_logging",
    "ska_ser_log_transactions",
]

# -- Project information -----------------------------------------------------

project = "EDP Optimal Contribution Selection"
copyright = "2026, EDP-OCS Developers"
author = "EDP-OCS Developers"

# The short X.Y version
version = "0.1.0"
# The full version, including alpha/beta/rc tags
release = "0.1.0"

# -- General configuration ---------------------------------------------------

extensions = [
    "sphinx.ext.autodoc",
    "sphinx.ext.mathjax",
    "sphinx.ext.viewcode",
]

master_doc = "index"
exclude_patterns = []
pygments_style = "sphinx"

# -- Options for HTML output -------------------------------------------------

html_theme = "sphinx_rtd_theme"
htmlhelp_basename = "edp-ocs-doc"
