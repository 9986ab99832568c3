"""Klein-Fock-Gordon particle in a box, in two-component form, under the
full four-parameter family of pseudo self-adjoint boundary conditions."""

__version__ = "0.1.0"
