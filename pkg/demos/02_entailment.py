"""
Default beliefs and what a user is committed to
===============================================

Users believe whatever the public database says unless they said
otherwise.  This script compares two independent ways of deciding
whether a belief statement follows from the annotations: the canonical
Kripke structure and a brute-force closure that lifts statements one
user at a time.
"""

from beliefdb import NEG, POS, build_canonical, kripke_eval, oracle_entails, stmt
from beliefdb.sample import ALICE, BOB, CAROL, USERS, database, s1_1, s2_1

db = database()
k = build_canonical(db)

# %%
# The canonical structure
# -----------------------
# Only annotated paths (and their prefixes) become states.  Every other
# path is routed to its deepest suffix that is a state.
print(k.describe(USERS))

# %%
# Asking questions
# ----------------
questions = [
    ((CAROL,), s1_1, POS, "Carol believes the eagle (inherited)"),
    ((BOB,), s1_1, POS, "Bob believes the eagle"),
    ((BOB,), s2_1, NEG, "Bob rules out the crow (a raven has the same key)"),
    ((BOB, ALICE), s2_1, POS, "Bob thinks Alice saw a crow"),
    ((CAROL, BOB), s1_1, NEG, "Carol thinks Bob rejects the eagle"),
]
for path, t, sign, text in questions:
    s = stmt(path, t, sign)
    print(f"{text:<52} kripke={kripke_eval(k, s)!s:<5} closure={oracle_entails(db, s)}")
