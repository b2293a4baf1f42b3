#!/usr/bin/env python3
"""Fit the decay of 1 - |eta_k| for lift sequences against the closed forms.

Run before relying on the truncation machinery: for the annulus the deficits
decay geometrically with rate 2 pi^2 / log(1/R) per winding (hyperbolic
translation length of the core geodesic); for the punctured disc they decay
like 1/k^2.  The script prints fitted rates next to the predictions and the
implication for the Green-function truncation strategy.

Usage: python scripts/decay_fit.py
"""

import numpy as np

from lempertpoles.covering_domains import PlaneDomain, build_cover


def fit_annulus(R: float):
    dom = PlaneDomain("annulus", R=R)
    cover = build_cover(dom, (R + 1) / 2)
    a = (R + 0.55 * (1 - R)) * np.exp(0.7j)
    ls = cover.lifts(a, 6)
    pos = ls.windings > 0
    ks = ls.windings[pos].astype(float)
    slope = np.polyfit(ks, np.log(ls.delta[pos]), 1)[0]
    predicted = -2 * np.pi ** 2 / (-np.log(R))
    print(f"annulus R={R}: fitted rate {slope:+.4f}, predicted {predicted:+.4f} "
          f"(rel dev {abs(slope - predicted) / abs(predicted):.2%})")
    return slope, predicted


def fit_punctured():
    dom = PlaneDomain("punctured")
    cover = build_cover(dom, 0.4)
    a = 0.5 * np.exp(0.9j)
    ls = cover.lifts(a, 256)
    ks = ls.windings
    keep = ks > 8
    slope = np.polyfit(np.log(ks[keep].astype(float)), np.log(ls.delta[keep]), 1)[0]
    print(f"punctured disc: fitted log-log slope {slope:+.4f}, predicted -2 "
          f"(deficits ~ C/k^2)")
    return slope


def main():
    print("lift deficit decay rates\n")
    for R in (0.1, 0.3, 0.6):
        fit_annulus(R)
    fit_punctured()
    print(
        "\nconsequences for truncation:\n"
        "  - annulus products converge geometrically: a handful of windings\n"
        "    reaches machine precision, certified by a geometric majorant;\n"
        "  - punctured-disc products converge like 1/K: plain truncation\n"
        "    cannot certify 1e-8, so the winding tails are summed through\n"
        "    exact digamma/trigamma formulas with a bracketed remainder."
    )


if __name__ == "__main__":
    main()
