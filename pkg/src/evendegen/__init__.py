"""Even-degeneracy of random graphs: deciders, removal procedures, samplers and checks."""

__version__ = "0.1.0"
