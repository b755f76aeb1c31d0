#!/usr/bin/env python3
"""The three-stage agnostic list pipeline on a noisy distribution.

Stage 1 boosts a finite cover: for every hypothesis, a union of
one-inclusion predictors trained on small weighted subsamples that covers
all of its consistent points.  Stage 2 runs multiplicative weights over the
cover to stitch a menu.  Stage 3 minimizes the inside-menu loss and trains a
realizable list learner on the points the winner got right.
"""

from fractions import Fraction

import numpy as np

from dslab import gen_cube
from dslab.agnostic import (agnostic_pipeline, build_list_cover,
                            inside_menu_erm, mw_menu)
from dslab.learn import SyntheticDistribution

H = gen_cube(3, 1, 1, 3)
D = SyntheticDistribution.with_label_noise(H, target=0, noise=Fraction(1, 10))
rng = np.random.default_rng(0)
S1, S2, S3 = D.draw(rng, 40), D.draw(rng, 30), D.draw(rng, 80)

cover = build_list_cover(H, S1, d=4, j=6, ell=1, rng=np.random.default_rng(1))
print("cover members:", len(cover), " uncovered hypotheses:", cover.uncovered)

menu = mw_menu(cover, S2, rng=np.random.default_rng(2))
print("rounds:", len(menu.trace), " menu members:", menu.menu_members())
print("first weight updates:", menu.weight_history[0], "->", menu.weight_history[1])
print("menu at each instance:", {x: sorted(menu.predict(x)) for x in range(1, 4)})

res = inside_menu_erm(H, menu, S3, ell=1)
print("ERM hypothesis:", H.hyps[res.erm_index],
      " inside-menu losses: erm", res.erm_loss, " predictor", res.predictor_loss)

# End to end, with exact error accounting against the best hypothesis.
report = agnostic_pipeline(H, D, ell=1, n1=200, T=100, n3=400, delta=0.1, seed=3)
r = report.results
print("pipeline error:", r["err"], " best hypothesis error:", r["best_err"],
      " excess:", r["excess_err"])
print("loss decomposition:", r["decomposition"])
