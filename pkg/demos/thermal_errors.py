"""
From a thermal unit to cluster-state error rates
================================================

A POVM on the center spin turns each unit into a four-qubit GHZ state. At
finite temperature the result is noisy; twirling over the GHZ stabilizers
makes the noise a Pauli channel whose class probabilities feed the
cluster-qubit phase error p_z and loss p_l.
"""

from qcpower.cluster_errors import cluster_error_rates
from qcpower.ghz_distill import distill_channel, p_delete
from qcpower.pauli_channel import extract_error_probs, format_report, twirl
from qcpower.thermal_state import thermal_state
from qcpower.unit_models import ModelParams, deformation_parameter

params = ModelParams.xxz(0.0)
ghz = distill_channel(thermal_state(params, 0.16), deformation_parameter(params))
dist = extract_error_probs(twirl(ghz.rho16), ghz.p_s)
print(format_report(dist))

rates = cluster_error_rates(dist)
print(f"p_z = {rates.p_z:.3e}, p_l = {rates.p_l:.3f}")
for name, p in rates.correlated:
    print(f"  {name}: {p:.2e}")

# below 3a^2 = 1 the z outcome of the POVM is a loss event
params = ModelParams.xxz(-1.1)
a = deformation_parameter(params)
print(f"\ndelta = -1.1: a^2 = {a * a:.4f}, p_delete = {p_delete(a):.4f}")
for T in (0.0, 0.02, 0.05):
    ghz = distill_channel(thermal_state(params, T), a)
    rates = cluster_error_rates(extract_error_probs(twirl(ghz.rho16), ghz.p_s))
    print(f"T = {T:.2f}: p_s = {ghz.p_s:.4f}, p_l = {rates.p_l:.4f}, p_z = {rates.p_z:.2e}")
