"""Decay exponents for multilinear oscillatory integral forms.

The package measures and certifies the power/log decay in lambda of

    Lambda(f) = integral of exp(i * lambda * phi(x)) * chi(x) * prod_j f_j(x_j)

for polynomial phases phi, smooth compactly supported cutoffs chi and
one-variable test functions f_j.  The predicted sharp rate comes from exact
Newton-polyhedron geometry; the numerical side provides oscillatory
quadrature, per-box certificates and diagnostic sweeps.
"""

__version__ = "0.1.0"
