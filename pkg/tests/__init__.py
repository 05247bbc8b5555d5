"""Test package.

This file exists to make `tests.helpers.*` importable from the test modules.
"""
