"""Capacity-planning toolkit for islanded community microgrids.

Sizes dispatchable gensets and battery storage at minimum annualized cost
subject to reliability constraints: LCOE/QFD screening, Monte Carlo
LOLE/SAIFI adequacy, spectral net-load decomposition, and swarm search over
the cut-off frequency.
"""

from .cost_model import (AnnualizedCost, CostParameters, DEFAULT_QFD_MATRIX,
                         QfdMatrix, annualize_costs, annualize_storage_costs,
                         capital_recovery_factor, lcoe, lcoe_vs_cf_curve,
                         qfd_score, realized_capacity_factor)
from .planner import (AdequacyCheck, PlanResult, PlannerConfig,
                      ReliabilitySettings, RoundRecord, SizingSolution,
                      check_supply_adequacy, evaluate_candidate, plan,
                      planning_profiles, sensitivity_sweep)
from .pso import PsoConfig, PsoResult, optimize
from .reliability import (AdequacyEvaluator, DispatchableUnit,
                          PrmSearchResult, ReliabilityConfig,
                          ReliabilityMetrics, evaluate_reliability,
                          min_prm_for_lole, planning_capacity, plg,
                          prm_of_fleet, reliability_curve, search_min_prm,
                          synthesize_fleet)
from .sizing import (BessParameters, FleetDesign, allocate_ng_units,
                     bess_dc_power, size_bess_energy, size_bess_power,
                     size_gensets, stored_energy_trajectory)
from .spectral_split import (FrequencySpectrum, SplitResult, forward_transform,
                             inverse_transform, lowpass_split,
                             nyquist_frequency_cph, snap_cutoff_to_bin)
from .stochastic_models import (LoadModel, PvVariability, RenewableModel,
                                TimeSeries, WindVariability, clear_sky_shape,
                                community_load_shape, generate_load,
                                generate_renewable, net_load, read_series_csv,
                                steady_wind_shape, write_series_csv)

__version__ = "0.1.0"
