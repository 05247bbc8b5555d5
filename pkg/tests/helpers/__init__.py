"""Brute-force oracles and artifact readers for the tests."""
