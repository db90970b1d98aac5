#!/usr/bin/env python3
"""Extract per-instruction energy from paired total/overhead runs.

A pair of simulated devices models the two benchmark variants: both share
idle power, launch overhead and duration; the total device draws extra
power corresponding to a known per-instruction cost. Measuring both and
dividing the energy difference by the instruction count must recover that
cost.
"""

import dataclasses

from instrujoule import (
    KernelLaunchWorkload,
    KernelVariant,
    Strategy,
    SyntheticDeviceProvider,
    SyntheticModel,
    find_instruction,
    generate_kernel,
    measure_instruction,
)

spec = find_instruction("div", "u32")
iterations, unroll = 1_000_000, 5
kernel = generate_kernel(spec, KernelVariant.TOTAL, iterations, unroll)
n_instructions = kernel.n_instructions
print(f"benchmark: {kernel.entry_name}, {n_instructions:,} dependent divides per run")

injected_uj = 3.87  # per-instruction cost the simulation hides in the total run
duration = 2.0
extra_mw = n_instructions * injected_uj / 1000.0 / duration
overhead_model = SyntheticModel(
    p_idle=20_000.0, p_kernel=25_000.0, kernel_duration=duration,
    noise_stddev=400.0, rng_seed=3,
)
total_model = dataclasses.replace(overhead_model, p_kernel=25_000.0 + extra_mw)
print(f"injected cost: {injected_uj} uJ/instruction "
      f"(total device draws {extra_mw / 1000:.1f} W extra)\n")

factories = (
    lambda: SyntheticDeviceProvider(total_model),
    lambda: SyntheticDeviceProvider(overhead_model),
)
for strategy in (Strategy.MTSM, Strategy.PAPI_STYLE):
    result = measure_instruction(
        factories,
        KernelLaunchWorkload(label="total"),
        KernelLaunchWorkload(label="overhead"),
        n_instructions,
        strategy,
        spec=spec,
    )
    err = 100 * (result.energy_per_instruction - injected_uj) / injected_uj
    print(f"{strategy.value:5s}: e_total {result.e_total / 1000:8.2f} J, "
          f"e_overhead {result.e_overhead / 1000:8.2f} J "
          f"-> {result.energy_per_instruction:.4f} uJ/instruction ({err:+.2f}%)"
          + ("  [negative net]" if result.negative_net else ""))
