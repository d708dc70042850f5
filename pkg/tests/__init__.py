"""Tests for the selection solvers."""
