"""Runs the number-agreement example through the Python bindings."""

import pyifgram as ifg

g = ifg.Grammar.parse(ifg.JOHN_READ_HERE)
assert len(g) == 6 and g.start == "s"

spec = ifg.specialize(g, "john read here".split())
assert len(spec) == 6 and spec.non_if_count() == 2

if_g, stats = ifg.to_interaction_free(spec)
assert stats["eliminated"] == 1, stats
sols = ifg.enumerate_solutions(if_g)
assert len(sols) == 1
s = sols[0]
assert s.render() == "#0{l:#1{lex:john n:sg} r:#2{l:#3{lex:read n:sg} r:#4{lex:here} n:sg}}"
assert s.get(["l", "n"]) == "sg" and s.get(["r", "n"]) == "sg" and s.get(["r", "l", "n"]) == "sg"
assert ifg.multiset_equal(sols, ifg.oracle_enumerate(spec))

plural = ifg.Grammar.parse(ifg.JOHN_READ_HERE + "np(NP) -> [they] { [[NP],(lex,they),(n,pl)] }.\n")
lattice = ifg.Fsa.parse("state 0 1 2 3\nstart 0\nfinal 3\narc 0 john 1\narc 0 they 1\narc 1 read 2\narc 2 here 3\n")
assert lattice.accepting_path_count() == 2
spec2 = ifg.specialize(plural, lattice)
sols2 = ifg.enumerate_solutions(ifg.to_interaction_free(spec2)[0])
assert len(sols2) == 2
assert ifg.multiset_equal(sols2, ifg.oracle_enumerate(spec2))

assert ifg.standardize_text("[[A],(n,sg)], [[A],(n,pl)]") == "TOP"
print("ok")
