#!/usr/bin/env python3
"""Walk the instruction catalog and generate single-instruction PTX kernels.

Each benchmark is a counted loop around a chain of dependent copies of one
instruction. The overhead variant is the same kernel with the chain removed,
so the difference between the two runs isolates the instruction itself.
"""

import difflib

from instrujoule import (
    KernelVariant,
    emit_build_recipe,
    find_instruction,
    generate_kernel,
    list_catalog,
    validate_kernel,
)

catalog = list_catalog()
print(f"catalog holds {len(catalog)} instructions in 8 groups:\n")
by_category = {}
for spec in catalog:
    by_category.setdefault(spec.category.value, []).append(spec.display_name)
for category, names in by_category.items():
    print(f"  {category:18s} {', '.join(names)}")

print("\n--- unsigned integer divide, total variant " + "-" * 30)
div = find_instruction("div", "u32")
total = generate_kernel(div, KernelVariant.TOTAL, iterations=1_000_000, unroll_factor=5)
print(total.ptx_text)

report = validate_kernel(total)
print("validator:", report.summary())

overhead = generate_kernel(div, KernelVariant.OVERHEAD, iterations=1_000_000, unroll_factor=5)
diff = [
    line
    for line in difflib.ndiff(total.ptx_text.splitlines(), overhead.ptx_text.splitlines())
    if line[:1] in "+-"
]
print(f"\noverhead variant differs by exactly {len(diff)} lines (the unrolled chain):")
for line in diff:
    print(" ", line)

print("\n--- build recipe for real hardware " + "-" * 38)
print(emit_build_recipe(total))
