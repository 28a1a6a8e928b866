"""The bird-sighting curation example used throughout the docs and tests.

Three users annotate a small sightings database: Carol reports a bald
eagle, Bob disputes it, Alice reports a crow, and Bob believes it was a
raven while explaining why Alice thought otherwise.
"""

from __future__ import annotations

from .core import NEG, POS, BeliefDatabase, Schema, stmt, tup

ALICE, BOB, CAROL = 1, 2, 3
USERS = {ALICE: "Alice", BOB: "Bob", CAROL: "Carol"}

SCHEMA = Schema.of(
    Sightings=["sid", "uid", "species", "date", "location"],
    Comments=["cid", "comment", "sid"],
)

s1_1 = tup("Sightings", "s1", "Carol", "bald eagle", "6-14-08", "Lake Forest")
s1_2 = tup("Sightings", "s1", "Carol", "fish eagle", "6-14-08", "Lake Forest")
s2_1 = tup("Sightings", "s2", "Alice", "crow", "6-14-08", "Lake Placid")
s2_2 = tup("Sightings", "s2", "Alice", "raven", "6-14-08", "Lake Placid")
c1_1 = tup("Comments", "c1", "found feathers", "s2")
c2_1 = tup("Comments", "c2", "black feathers", "s2")
c2_2 = tup("Comments", "c2", "purple-black feathers", "s2")

STATEMENTS = [
    stmt((), s1_1, POS),
    stmt((BOB,), s1_1, NEG),
    stmt((BOB,), s1_2, NEG),
    stmt((ALICE,), s2_1, POS),
    stmt((ALICE,), c1_1, POS),
    stmt((BOB,), s2_2, POS),
    stmt((BOB, ALICE), c2_1, POS),
    stmt((BOB,), c2_2, POS),
]


def database() -> BeliefDatabase:
    return BeliefDatabase(SCHEMA, USERS, frozenset(STATEMENTS))


SETUP_SCRIPT = """\
create relation Sightings(sid str, uid str, species str, date str, location str);
create relation Comments(cid str, comment str, sid str);
adduser 'Alice';
adduser 'Bob';
adduser 'Carol';
"""

INSERT_SCRIPT = """\
insert into Sightings
  values ('s1','Carol','bald eagle','6-14-08','Lake Forest');
insert into BELIEF 'Bob' not Sightings
  values ('s1','Carol','bald eagle','6-14-08','Lake Forest');
insert into BELIEF 'Bob' not Sightings
  values ('s1','Carol','fish eagle','6-14-08','Lake Forest');
insert into BELIEF 'Alice' Sightings
  values ('s2','Alice','crow','6-14-08','Lake Placid');
insert into BELIEF 'Alice' Comments
  values ('c1','found feathers','s2');
insert into BELIEF 'Bob' Sightings
  values ('s2','Alice','raven','6-14-08','Lake Placid');
insert into BELIEF 'Bob' BELIEF 'Alice' Comments
  values ('c2','black feathers','s2');
insert into BELIEF 'Bob' Comments
  values ('c2','purple-black feathers','s2');
"""

# Sightings believed by Bob at a location.
Q1 = """\
select S.sid, S.uid, S.species
from Users as U, BELIEF U.uid Sightings as S
where U.name = 'Bob'
  and S.location = 'Lake Placid'
"""

# Entries on which some user disagrees with Alice's species.
Q2 = """\
select U2.name, S1.species, S2.species
from Users as U1, Users as U2,
     BELIEF U1.uid Sightings as S1,
     BELIEF U2.uid Sightings as S2
where U1.name = 'Alice'
  and S1.sid = S2.sid
  and S1.species <> S2.species
"""

SCRIPT = SETUP_SCRIPT + INSERT_SCRIPT

# Users who reject a sample classification that another user asserts.
# Comma placement is kept loose on purpose; the parser accepts it.
SAMPLES_SCHEMA = Schema.of(R=["sample", "category", "origin"])

Q_DISAGREE = """\
select R1.sample, U1.name, U2.name
from Users as U1, Users as U2
     BELIEF U1.uid R as R1,
     BELIEF U2.uid not R as R2,
where R1.sample = R2.sample
  and R1.category = R2.category
  and R1.origin = R2.origin
"""
