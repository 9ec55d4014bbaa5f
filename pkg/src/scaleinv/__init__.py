"""Scale-invariant groups: self-similar actions, nuclei, tilings and witnesses."""

__version__ = "0.1.0"
