#!/usr/bin/env python3
"""Generates frozen repeated-measures ANOVA fixtures with statsmodels.

Run once; the output header is committed and the C++ tests compare against it.
    python3 tests/oracles/anova_reference.py > tests/oracles/anova_fixtures.hpp
"""
import numpy as np
import pandas as pd
from scipy import stats
from statsmodels.stats.anova import AnovaRM

N_DATASETS = 10
N_SUBJECTS = 18
EFFECTS = [("interface", "A"), ("preview", "B"), ("interface:preview", "AxB")]


def dataset(seed):
    rng = np.random.default_rng(seed)
    subject_offset = rng.normal(0.0, 10.0, N_SUBJECTS)
    a_effect, b_effect, ab_effect = rng.normal(0.0, 3.0, 3)
    rows = []
    for s in range(N_SUBJECTS):
        for a, interface in enumerate(("GUI", "AR")):
            for b, preview in enumerate(("off", "on")):
                value = (60.0 + subject_offset[s] + a_effect * a + b_effect * b
                         + ab_effect * a * b + rng.normal(0.0, 8.0))
                rows.append((s + 1, interface, preview, float(round(value, 6))))
    return pd.DataFrame(rows, columns=["subject", "interface", "preview", "value"])


def main():
    print("// Generated by tests/oracles/anova_reference.py (statsmodels AnovaRM); do not edit.")
    print("#pragma once")
    print()
    print("#include <array>")
    print()
    print("namespace anova_fixtures {")
    print()
    print("struct Row { int subject; const char* interface; const char* preview; double value; };")
    print("struct Effect { double F; double df_num; double df_den; double p; };")
    print(f"struct Dataset {{ unsigned seed; std::array<Row, {N_SUBJECTS * 4}> rows; Effect a, b, ab; }};")
    print()
    print(f"inline const std::array<Dataset, {N_DATASETS}> kDatasets = {{{{")
    for seed in range(1, N_DATASETS + 1):
        df = dataset(seed)
        table = AnovaRM(df, "value", "subject", within=["interface", "preview"]).fit().anova_table
        print(f"    {{{seed}u, {{{{")
        for r in df.itertuples(index=False):
            print(f'        {{{r.subject}, "{r.interface}", "{r.preview}", {r.value!r}}},')
        print("    }},")
        effects = []
        for name, _ in EFFECTS:
            row = table.loc[name]
            effects.append(f"{{{float(row['F Value'])!r}, {float(row['Num DF'])!r}, {float(row['Den DF'])!r}, {float(row['Pr > F'])!r}}}")
        print("    " + ", ".join(effects) + "},")
    print("}};")
    print()
    print(f"inline constexpr double kTableF = 4.45;")
    print(f"inline constexpr double kTableP = {float(stats.f.sf(4.45, 1, 17))!r};")
    print()
    print("} // namespace anova_fixtures")


if __name__ == "__main__":
    main()
