"""
The relational encoding
=======================

A belief database is stored as ordinary relations: one ``R*`` table of
distinct tuples per content relation, a ``R_V`` table saying which
tuples each world holds (with sign and an explicit flag), and the
structure tables ``E`` (edges), ``D`` (depth), ``S`` (deepest suffix)
and ``U`` (users).
"""

from beliefdb import check_integrity, dumps, materialize, stats
from beliefdb.sample import database

store = materialize(database())
check_integrity(store)

# %%
# All internal tables in the text dump format used on disk.
print(dumps(store))

# %%
# Size report
# -----------
# Implicit rows (flag ``n``) are the price of materializing defaults.
# The relative overhead divides all rows by the number of annotations.
report = stats(store, n=8)
print(report)
print(f"relative overhead: {report.overhead:.2f}")
