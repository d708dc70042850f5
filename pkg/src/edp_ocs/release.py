"""Release information for edp-ocs package."""

NAME = "edp-ocs"
VERSION = "0.1.0"
VERSION_INFO = VERSION.split(".")
AUTHOR = "Breeding Optimisation team"
LICENSE = "License :: OSI Approved :: BSD License"
COPYRIGHT = "BSD-3-Clause"
