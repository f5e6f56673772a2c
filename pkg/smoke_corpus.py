import sys

sys.path.insert(0, "src")

from moebius.parser import parse_program
from moebius.elaborate import elaborate_program, check_program, link
from moebius.machine import evaluate

PROGRAMS = {}

PROGRAMS["nth"] = """
nth : int -> ['a:*, v:'a list |- 'a];
nth n = if n <= 0 then box('a,v. hd v)
        else let box ('a,v. X) = nth (n - 1) in box('a,v. X with 'a, tl v);

nth 2
"""

PROGRAMS["combine"] = """
combine : bool -> [c:(x:int |-^1 int), d:(x:int |-^1 int), x:int |-^2 int];
combine p = if p then box(c,d,x. (fun y -> c with y) (d with x))
            else box(c,d,x. (fun y -> d with y) (c with x));

combine true
"""

PROGRAMS["combine_demo"] = """
combine : bool -> [c:(x:int |-^1 int), d:(x:int |-^1 int), x:int |-^2 int];
combine p = if p then box(c,d,x. (fun y -> c with y) (d with x))
            else box(c,d,x. (fun y -> d with y) (c with x));

let box (c,d,x. U) = combine true in
U with ((x. x + 2*x), (x. x*3), 3)
"""

PROGRAMS["lift_int"] = """
lift_int : int -> [int];
lift_int n = if n = 0 then box(0) else let box(X) = lift_int (n - 1) in box(X + 1);

lift_int 3
"""

PROGRAMS["eval_int"] = """
lift_int : int -> [int];
lift_int n = if n = 0 then box(0) else let box(X) = lift_int (n - 1) in box(X + 1);

eval_int : [int] -> int;
eval_int x = let box X = x in X;

eval_int (lift_int 5)
"""

PROGRAMS["lift_list"] = """
lift_int : int -> [int];
lift_int n = if n = 0 then box(0) else let box(X) = lift_int (n - 1) in box(X + 1);

lift_list : ('a:( |- *)) -> 'a list -> ('a -> ['a]) -> ['a list];
lift_list 'a l lift = match l with
  | [] -> box([])
  | x :: xs -> let box X = lift x in
               let box XS = lift_list (. 'a) xs lift in box(X :: XS);

lift_list (. int) (1 :: 2 :: ([] : int list)) lift_int
"""

PROGRAMS["gen_church_pred"] = """
gen_church : int -> ['a:*, x:'a, f:'a -> 'a |- 'a];
gen_church n = if n = 0 then box('a,x,f. x)
               else let box('a,x,f. N) = gen_church (n - 1) in box('a,x,f. f N);

add : ['a:*, x:'a, f:'a -> 'a |- 'a] -> ['a:*, x:'a, f:'a -> 'a |- 'a]
   -> ['a:*, x:'a, f:'a -> 'a |- 'a];
add n m = let box ('a,x,f. N) = n in
          let box ('a,x,f. M) = m in box('a,x,f. N with 'a, M, f);

pred : ['a:*, x:'a, f:'a -> 'a |- 'a] -> ['a:*, x:'a, f:'a -> 'a |- 'a];
pred n = case n of
  | box('a,x,f. x) -> box('a,x,f. x)
  | box('a,x,f. f X) -> box('a,x,f. X);

pred (add (gen_church 2) (gen_church 3))
"""

PROGRAMS["intro_letbox"] = """
let box (y. R) = box (y:int. y + 2) in
let box (c,x. U) = box (c:(y:int |-^1 int), x:int. 3 * x + (c with (2 * x))) in
box (y:int. U with ((y. R with y), y))
"""

PROGRAMS["map"] = """
lift_int : int -> [int];
lift_int n = if n = 0 then box(0) else let box(X) = lift_int (n - 1) in box(X + 1);

map : ('a:( |- *)) -> 'a list -> ('a -> ['a]) -> ['b:*, f:'a -> 'b |- 'b list];
map 'a l lift = match l with
  | [] -> box('b,f. [])
  | x :: xs -> let box X = lift x in
               let box ('b,f. XS) = map (. 'a) xs lift in
               box('b,f. f X :: XS);

map (. int) (1 :: 2 :: ([] : int list)) lift_int
"""

PROGRAMS["map_reduce"] = """
lift2 : int -> [ |-^2 int];
lift2 n = if n = 0 then box^2(0) else let box U = lift2 (n - 1) in box^2(U + 1);

map_reduce : ('a:( |-^2 *)) -> 'a list -> ('a -> [ |-^2 'a])
          -> ['b:( |-^1 *), f:'a -> 'b, liftB:'b -> [ |-^1 'b]
                |-^2 ['c:*, g:'b -> 'c -> 'c, base:'c |-^1 'c]];
map_reduce 'a l liftA = match l with
  | [] -> box ('b,f,liftB. box('c,g,base. base))
  | x :: xs ->
      let box ('b,f,liftB. R) = map_reduce (. 'a) xs liftA in
      let box A = liftA x in
      box ('b,f,liftB.
        let box ('c,g,base. M) = R in
        let box X' = liftB (f A) in
        box ('c,g,base. M with 'c, g, (g X' base)));

map_reduce (. int) (1 :: 2 :: ([] : int list)) lift2
"""

if __name__ == "__main__":
    failures = 0
    for name, src in PROGRAMS.items():
        try:
            prog = elaborate_program(parse_program(src))
            rep = check_program(prog)
            v = evaluate(link(prog), fuel=2_000_000)
            print(f"{name}: OK  => {v}")
        except Exception as exc:
            failures += 1
            print(f"{name}: FAIL  {type(exc).__name__}: {exc}")
    sys.exit(1 if failures else 0)
