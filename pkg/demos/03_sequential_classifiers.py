#!/usr/bin/env python3
"""Additive vs maxitive sequential classification on one symbol stream.

The additive classifier sums evidence over every feature; the maxitive
one follows only the most discriminative feature route.  On ambiguous
streams the two can commit to different patterns.
"""

import numpy as np

from sigmamax import ConditionalTable, OutcomeSet, prob_to_poss, DiscreteProbability
from sigmamax.classify import (
    MAX,
    SIGMA,
    ClassifierModel,
    initial_state,
    map_decision,
    max_classify_step,
    sigma_classify_step,
)

patterns = OutcomeSet(["transport", "fighter"])
features = OutcomeSet(["steady course", "sharp turns"])
symbols = ["slow blip", "fast blip", "jinking blip", "faint blip"]

prob_rows = np.array([[0.85, 0.15],    # steady course -> mostly transport
                      [0.30, 0.70]])   # sharp turns  -> mostly fighter
lik_rows = np.array([[0.55, 0.25, 0.05, 0.15],
                     [0.10, 0.30, 0.45, 0.15]])


def likelihood(z, f):
    return lik_rows[features.index(f), symbols.index(z)]


sigma_model = ClassifierModel(
    patterns, features,
    ConditionalTable(features, patterns, prob_rows, "probability"),
    likelihood, SIGMA)
max_model = ClassifierModel(
    patterns, features,
    ConditionalTable(features, patterns,
                     prob_rows / prob_rows.max(axis=1, keepdims=True), "possibility"),
    likelihood, MAX)

# this mixed stream splits the two: summed evidence tips toward the
# fighter while the best single-feature route stays with the transport
stream = ["slow blip", "fast blip", "jinking blip"]

s_state = initial_state(sigma_model)
m_state = initial_state(max_model)
print(f"{'measurement':>14} | {'additive belief':>24} | {'maxitive belief':>24}")
print(f"{'(prior)':>14} | {str(s_state.belief.weights.round(3)):>24} "
      f"| {str(m_state.belief.weights.round(3)):>24}")
for z in stream:
    s_state = sigma_classify_step(s_state, z, sigma_model)
    m_state = max_classify_step(m_state, z, max_model)
    print(f"{z:>14} | {str(s_state.belief.weights.round(3)):>24} "
          f"| {str(m_state.belief.weights.round(3)):>24}")

print(f"\nadditive decision: {map_decision(s_state)}")
print(f"maxitive decision: {map_decision(m_state)}")
print("\nWith a single feature both classifiers reduce to the same decision rule:")
single = OutcomeSet(["only"])
s1 = ClassifierModel(patterns, single,
                     ConditionalTable(single, patterns, [[0.5, 0.5]], "probability"),
                     lambda z, f: 1.0, SIGMA)
m1 = ClassifierModel(patterns, single,
                     ConditionalTable(single, patterns, [[1.0, 1.0]], "possibility"),
                     lambda z, f: 1.0, MAX)
prior = DiscreteProbability(patterns, [0.3, 0.7])
print(f"  additive MAP: {map_decision(initial_state(s1, prior.weights))}, "
      f"maxitive MAP: {map_decision(initial_state(m1, prob_to_poss(prior).weights))}")
