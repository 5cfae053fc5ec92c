"""Exact multiple Verlinde sums, partition functions and quasi-polynomial germs."""
