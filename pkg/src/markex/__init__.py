"""Reinforced random walks and predictive characterizations of Markov exchangeability."""

__version__ = "0.1.0"
