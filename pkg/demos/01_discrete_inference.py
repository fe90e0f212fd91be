#!/usr/bin/env python3
"""Tour of the discrete machinery: two normalizations and their bridges.

A probability distribution sums to 1; a possibility distribution peaks
at 1.  The ratio transforms move between them, each calculus has its own
composition and Bayes-style update, and a hybrid joint couples a random
variable with a fuzzy one.
"""

import numpy as np

from sigmamax import (
    ConditionalTable,
    DiscretePossibility,
    DiscreteProbability,
    OutcomeSet,
    compose_fuzzy,
    compose_hetero_to_prob,
    compose_stochastic,
    hybrid_from_marginal_conditional,
    induced_marginal,
    poss_to_prob,
    possibility_update,
    prob_to_poss,
    prob_update_with_poss_likelihood,
)

weather = OutcomeSet(["sunny", "cloudy", "rainy"])

print("== Ratio transforms ==")
p = DiscreteProbability(weather, [0.5, 0.3, 0.2])
pi = prob_to_poss(p)
print(f"probability  {p.weights}  (sums to {p.weights.sum():.3f})")
print(f"possibility  {pi.weights}  (peaks at {pi.weights.max():.3f})")
print(f"round trip   {poss_to_prob(pi).weights}")

print("\n== Updates in both calculi ==")
posterior_pi = possibility_update(pi, [0.2, 0.9, 1.0])
print(f"possibility posterior (max-renormalized): {posterior_pi.weights.round(4)}")
posterior_p = prob_update_with_poss_likelihood(p, [0.2, 0.9, 1.0])
print(f"probability posterior (sum-renormalized): {posterior_p.weights.round(4)}")

print("\n== Composition: sum-product vs max-product ==")
mood = OutcomeSet(["good", "bad"])
activity = OutcomeSet(["hike", "museum", "stay home"])
weather_to_mood = ConditionalTable(weather, mood,
                                   [[0.9, 0.1], [0.6, 0.4], [0.2, 0.8]], "probability")
mood_to_activity = ConditionalTable(mood, activity,
                                    [[0.5, 0.3, 0.2], [0.1, 0.3, 0.6]], "probability")
chained = compose_stochastic(weather_to_mood, mood_to_activity)
print("stochastic chain rows (sum to 1):")
print(chained.rows.round(4))

fuzzy_wm = ConditionalTable(weather, mood, [[1.0, 0.1], [0.7, 1.0], [0.2, 1.0]], "possibility")
fuzzy_ma = ConditionalTable(mood, activity, [[1.0, 0.5, 0.2], [0.1, 0.5, 1.0]], "possibility")
fuzzy_chain = compose_fuzzy(fuzzy_wm, fuzzy_ma)
print("max-product chain rows (peak at 1): only the best route through the")
print("intermediate variable survives:")
print(fuzzy_chain.rows.round(4))

print("\n== Hybrid joint of a random and a fuzzy variable ==")
# fuzzy marginal over mood, probabilistic conditional for the weather report
report = OutcomeSet(["nice report", "grim report"])
cond = ConditionalTable(mood, report, [[0.8, 0.2], [0.3, 0.7]], "probability")
mood_poss = DiscretePossibility(mood, [1.0, 0.6])
joint = hybrid_from_marginal_conditional(cond, mood_poss)
print(f"cells:\n{joint.cells.round(4)}")
print(f"fuzzy-major normalization holds: {joint.satisfies_fuzzy_major()}")
print(f"random-major normalization holds: {joint.satisfies_random_major()}")
raw = induced_marginal(joint, "random")
print(f"raw induced report marginal {raw.round(4)} sums to {raw.sum():.3f} — not a")
print("proper distribution until renormalized; keep the raw form in likelihood position.")

print("\n== Heterogeneous fusion through an intermediate variable ==")
# p(report | mood) with poss(mood | season): induced distribution over reports
season = OutcomeSet(["summer", "winter"])
mood_given_season = ConditionalTable(season, mood, [[1.0, 0.3], [0.4, 1.0]], "possibility")
dist, raw = compose_hetero_to_prob(cond, mood_given_season, "winter")
print(f"winter: raw induced {raw.round(4)}, normalized {dist.weights.round(4)}")
