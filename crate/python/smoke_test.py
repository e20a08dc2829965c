"""Smoke test for the whittaker extension module."""

import json

import whittaker

f5 = whittaker.Field(2, 5)
assert f5.valuation("350") == "2"
assert f5.rho == "0"

s0 = whittaker.Mobius.order_p_fixing(f5, "7", "12")
assert s0 == whittaker.Mobius.from_ints(f5, 19, -168, 2, -19)
assert s0.apply("7") == "7"

cfg = whittaker.Configuration(f5, ["7", "12", "0", "5", "1", "inf"])
paired = cfg.pair_up()
assert paired.pairs() == [("7", "12"), ("0", "5"), ("1", "inf")]
word, cls = paired.audit(4)
assert cls == "elliptic", (word, cls)
v = cfg.run()
assert v.kind == "not_good" and v.folds == 1
assert v.trace()[0] == ["-5", "-10", "0", "5", "1", "inf"]

f7 = whittaker.Field(2, 7)
v = whittaker.Configuration(f7, ["1336/3", "-355", "-110", "86", "0", "7", "1", "inf"]).run()
assert v.kind == "good" and v.folds == 2
assert v.s_min.pairs() == [("-7", "42"), ("112", "-84"), ("0", "7"), ("1", "inf")]
assert v.s_min.audit(6) is None
assert v.s_min.hull_dot().startswith("graph skeleton {")

report, code = whittaker.run_problem(json.dumps({"p": 2, "ell": 7, "points": ["1336/3", "-355", "-110", "86", "0", "7", "1", "inf"]}))
assert code == 0
assert json.loads(report)["verdict"]["kind"] == "good"

try:
    whittaker.Configuration(f5, ["0", "5", "1"])
except ValueError:
    pass
else:
    raise AssertionError("odd configuration accepted")

print("smoke test ok")
