"""Quadratic success payments: vote pricing for non-linear outcome curves.

Submodules
----------
referendum  binomial referendum model ``p(y, n, i)`` and its oracles
curve       sampled, strictly increasing probability curves
pricing     cost regimes, ``i_max`` and the rational buyer
analysis    total cost closed forms, Big-O witnesses, K2 granularity
families    bundled demo curves and random curve generators
lattice     precomputed ``p(y, n, i)`` grids and their file format
cli         ``qsp`` command line
"""

from .errors import *  # noqa: F401,F403
from .referendum import (ReferendumModel, brute_force_probability, curve_for,
                         exact_probability_bought, majority, outcome_probability,
                         outcome_probability_bought)
from .curve import (LinearCurveSpec, ProbabilityCurve, curve_from_samples,
                    evaluate, invert, linear_curve, marginal, read_curve_csv,
                    write_curve_csv)
from .pricing import (QSP, UNAFFORDABLE, BuyerTrace, CostSchedule, Flat, Linear,
                      OneVote, PricingParams, build_schedule, check_k2,
                      cost_constant, cost_general, i_max_constant, i_max_general,
                      k2_upper_bound, rational_buyer)
from .analysis import (BigOWitness, CostAnalysis, GranularityReport, analyze,
                       averages, big_o_witness, granularity, i_squared_constant,
                       k2_sweep, optimal_k2_range, tight_m,
                       total_cost_closed_form, total_cost_constant_closed,
                       total_cost_direct, total_cost_from_averages)
from .lattice import LatticeSpec, LatticeTable, build_lattice, load, query, save

__version__ = "0.1.0"
