"""convexa: numerical differential geometry of Berger spheres, Heisenberg
space and pinched product spaces, with closed-form-vs-oracle verification
suites and a mesh sweep classifier."""

__version__ = "0.1.0"
