"""
Belief conjunctive queries
==========================

Queries mix positive and negative subgoals under belief paths whose
users may be variables.  They are translated into one temporary table
per subgoal joined over the internal relations; a negative subgoal
matches either a stated negative row or a positive row with the same
key but different values.
"""

from beliefdb import materialize, parse_bcq, query, translate
from beliefdb.beliefsql import lower_select, parse
from beliefdb.sample import Q_DISAGREE, SAMPLES_SCHEMA, database

# %%
# From BeliefSQL to a conjunctive query
# -------------------------------------
q = lower_select(parse(Q_DISAGREE), SAMPLES_SCHEMA, {1: "ann", 2: "ben"})
print(q)
same = parse_bcq("q(x,y,z) :- [y] R+(x,u,v), [z] R-(x,u,v)")
print("equivalent to the hand-written form:", q.equivalent(same))

# %%
# The translated plan
# -------------------
print(translate(same, SAMPLES_SCHEMA).render())

# %%
# Asking the sightings database
# -----------------------------
store = materialize(database())
for text in [
    "q(x,s) :- [2] Sightings+(x,_,s,_,_)",
    "q(u) :- [u] Sightings-(y,z,a,b,'Lake Placid'), [1] Sightings+(y,z,a,b,'Lake Placid')",
    "q(x) :- [3.2.3.1] Sightings+(x,_,'crow',_,_)",
]:
    print(text)
    print(query(store, text).to_table())
