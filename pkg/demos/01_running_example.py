"""
Curating bird sightings with disagreement
=========================================

Three users annotate a shared sightings table.  Carol reports a bald
eagle, Bob disputes it, Alice reports a crow, and Bob believes it was a
raven while also recording what he thinks Alice saw.  Everything is
entered as BeliefSQL through a :class:`beliefdb.Session`.
"""

from beliefdb import Session
from beliefdb.sample import INSERT_SCRIPT, Q1, Q2, SETUP_SCRIPT

# %%
# Schema and users
# ----------------
# ``create relation`` and ``adduser`` set up an empty belief database.
session = Session()
for result in session.execute(SETUP_SCRIPT):
    print(result.message())

# %%
# Annotations
# -----------
# Each insert states a tuple (or its negation) inside a chain of
# ``BELIEF 'user'`` prefixes.  An empty prefix is the public database.
for result in session.execute(INSERT_SCRIPT):
    print(result.message())

# %%
# What does Bob believe at Lake Placid?
# -------------------------------------
# Bob never mentioned Carol's eagle positively, and he replaced Alice's
# crow with a raven, so only the raven comes back.
print(Q1)
print(session.query(Q1).to_table())

# %%
# Who disagrees with Alice about a species?
# -----------------------------------------
print(Q2)
print(session.query(Q2).to_table())

# %%
# Re-entering a statement that is already explicit is a rejected insert,
# not an error.
(again,) = session.execute(INSERT_SCRIPT.split(";")[0] + ";")
print(again.message())
