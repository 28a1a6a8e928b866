"""
Incremental updates
===================

Inserts, deletes and new users are applied to the stored encoding
directly.  New worlds copy their defaults from the deepest suffix world,
and a change in one world is pushed to every world that inherits from
it.
"""

from beliefdb import NEG, POS, Store, add_user, delete_tuple, insert, materialize
from beliefdb.sample import ALICE, BOB, CAROL, SCHEMA, STATEMENTS, USERS, database, s1_1, s1_2

store = Store(SCHEMA, USERS)
for s in STATEMENTS:
    out = insert(store, s.path, s.tuple, s.sign)
    print(f"{s!r:<80} ok={out.success} new worlds={out.created_worlds}")

# %%
# The result matches a batch build, up to the numbering of ids.
print("same as batch build:", store.canonical() == materialize(database()).canonical())

# %%
# Rejected inserts
# ----------------
print(insert(store, (BOB,), s1_1, POS))  # contradicts Bob's explicit negation

# %%
# Deleting Bob's objection lets the public eagle flow back into his world.
bob = store.wid_of_path((BOB,))
print("before:", sorted(t.values[2] for t in store.world(bob).positive))
delete_tuple(store, (BOB,), s1_1, NEG)
print("after: ", sorted(t.values[2] for t in store.world(bob).positive))

# %%
# Nested paths create their missing prefixes on the way.
out = insert(store, (CAROL, ALICE), s1_2, NEG)
print("created", [store.path_of(w) for w in out.created_worlds])

# %%
# A new user starts out believing exactly the public database.
dave = add_user(store, "Dave")
print("Dave's edges:", [row for row in store.e_rows() if row[1] == dave])
