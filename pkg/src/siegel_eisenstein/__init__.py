"""Exact-arithmetic Siegel Eisenstein series: Fourier coefficients of any
genus, semi-ordinary p-stabilization, and Lambda-adic interpolation."""

from .arith import (CharacterSpec, PadicInt, PadicNumber, bernoulli,
                    dirichlet_L_neg, factor, fundamental_discriminant_decompose,
                    generalized_bernoulli, hilbert_symbol, kronecker_symbol,
                    padic_exp, padic_log, s_of, teichmuller)
from .errors import (BoundError, CertificationError, IntegralityError,
                     UnsupportedDomainError)
from .quadform import (HalfIntegralMatrix, LocalInvariants, LocalPolynomial,
                       block_decompose, disc_of, disc_split, enumerate_psd,
                       f_poly, f_poly_closed, f_poly_oracle,
                       functional_equation_check, invariants_of,
                       katsurada_recursion_check, local_square_character,
                       s_poly_closed, s_poly_sum)
from .eisenstein import (EisensteinSpec, QExpansion, StabilizationPolys,
                         constant_term, eisenstein_expansion, fourier_coeff,
                         fourier_coeff_chi, stabilization_polys,
                         stabilize_via_operator, stabilize_via_qstar,
                         stabilized_coeff, stabilized_expansion, u_pn_apply)
from .hecke import (HeckePolynomial, SatakeParams, divisibility_check,
                    hecke_polynomial, q_star, satake_params, zharkovskaya_check)
from .lambda_adic import (BranchSeries, FracLambda, LambdaElement, LambdaFamily,
                          a_T_lambda, b_poly, build_branch, compose,
                          lambda_eisenstein, one_plus_x_pow)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
