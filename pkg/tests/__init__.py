"""Test suite for the PRIMEBALL harness."""
