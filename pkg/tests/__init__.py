"""Test suite for My Quant V2."""
