"""Tempered fractional Brownian motion toolkit."""
