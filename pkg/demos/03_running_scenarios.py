"""
Running a verification scenario
===============================

A scenario fixes a root system, a ring Z/m and two ideals A, B. Each suite
checks one family of claims and reports orders, counts and witnesses.
"""

# %%
import json

from chevlab.verifier import load_scenario, run_scenario, scenario_names

print(scenario_names())

# %%
sc = load_scenario("sl3-z8")
print(sc.description)
print(sc.suites)

# %% A few suites; the report renders as text
report = run_scenario(sc, ["lemma2", "theoremB", "theorem2"])
print(report.to_text())

# %% and as JSON, without timings so that reruns are byte-identical
doc = json.loads(report.to_json(timings=False))
print(doc["sections"][0]["subgroup_orders"])

# %% Over Z/9 with A = B = (3) the product ideal is zero, so congruences are equalities
print(run_scenario("sp4-z9", ["theorem3"]).to_text())
