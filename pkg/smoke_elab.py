import sys

sys.path.insert(0, "src")

from moebius.parser import parse_program
from moebius.elaborate import elaborate_program, check_program, link
from moebius.machine import evaluate

SRC_LIFT = """
lift : int -> [ |-^1 int];
lift x = if x = 0 then box(0) else
  let box U = lift (x - 1) in box(U + 1);

lift 3
"""

SRC_CHURCH = """
gen : int -> ['a:*, x:'a, f:'a -> 'a |- 'a];
gen n = if n = 0 then box('a,x,f. x)
  else let box('b,y,g. U) = gen (n - 1) in box('a,x,f. f (U with 'a, x, f));

let box('c,z,s. BODY) = gen 3 in
(fn (q : int) -> BODY with (int, q, (fn (w : int) -> w + 1))) 10
"""

for name, src in [("lift", SRC_LIFT), ("church", SRC_CHURCH)]:
    sp = parse_program(src)
    prog = elaborate_program(sp)
    rep = check_program(prog)
    for n, t in rep:
        print(f"  {n} : {t}")
    v = evaluate(link(prog), fuel=100000)
    print(name, "=>", v)
