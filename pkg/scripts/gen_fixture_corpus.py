#!/usr/bin/env python3
"""Generate the annotated fixture corpus used by the element-fidelity tests.

Emits tests/data/fixture_functions.jsonl: ~240 Java methods in the corpus
line format, seeded and deterministic. Each method stays inside the subset
the reference parser understands (no lambdas, shifts, annotations, or
non-primitive casts), covers the full element taxonomy across the corpus,
and is cross-checked oracle-vs-rules at generation time so presence
disagreements cannot be baked in silently.

The only allowed occurrence divergence is do-while (token rules count its
tail as a while statement, the parse tree does not); such methods always
contain a plain while loop too, keeping the presence bit identical.
"""

import json
import random
import sys
from pathlib import Path

REPO = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(REPO / "tests"))
sys.path.insert(0, str(REPO / "src"))

from oracles.java_parser import count_elements  # noqa: E402
from codeshift.elements import element_histogram  # noqa: E402

NAMES = ["value", "count", "total", "index", "result", "item", "score", "size",
         "limit", "offset", "buffer", "weight", "delta", "amount", "level"]
ARRAYS = ["data", "items", "values", "scores", "cells", "weights", "entries"]
METHODS = ["compute", "resolve", "update", "fetch", "apply", "merge", "scan",
           "build", "collect", "reduce", "locate", "filter"]


def gen_methods(rnd: random.Random):
    """Yield (description, code) pairs; composition is seeded-random."""

    def name():
        return rnd.choice(NAMES)

    def arr():
        return rnd.choice(ARRAYS)

    def mname():
        return rnd.choice(METHODS) + rnd.choice(["", "Value", "Item", "All", "Next"])

    def num(lo=0, hi=99):
        return str(rnd.randint(lo, hi))

    makers = []

    def maker(fn):
        makers.append(fn)
        return fn

    @maker
    def getter():
        t = rnd.choice(["int", "long", "double", "float", "String", "boolean"])
        f = name()
        return (f"returns the current {f}",
                f"{t} get{f.capitalize()}() {{ return this.{f}; }}")

    @maker
    def guarded_setter():
        f = name()
        return (f"sets {f} when the new value is not negative",
                f"void set{f.capitalize()}(int {f}) {{\n"
                f"  if ({f} >= 0) {{ this.{f} = {f}; }} else {{ this.{f} = 0; }}\n}}")

    @maker
    def array_sum():
        a, s = arr(), name()
        return (f"adds up all entries of {a}",
                f"int {mname()}(int[] {a}) {{\n  int {s} = 0;\n"
                f"  for (int i = 0; i < {a}.length; i++) {{ {s} += {a}[i]; }}\n"
                f"  return {s};\n}}")

    @maker
    def while_search():
        a = arr()
        return (f"looks for the first index of the target in {a}",
                f"int indexOf(int[] {a}, int target) {{\n  int i = 0;\n"
                f"  while (i < {a}.length) {{\n"
                f"    if ({a}[i] == target) {{ return i; }}\n    i++;\n  }}\n"
                f"  return -{num(1, 1)};\n}}")

    @maker
    def ternary_abs():
        v = name()
        return (f"absolute value of {v}",
                f"int absOf(int {v}) {{ return {v} >= 0 ? {v} : -{v}; }}")

    @maker
    def ternary_pick():
        a, b = name(), name()
        return ("picks the larger of two readings",
                f"double larger(double {a}, double {b}) {{ return {a} > {b} ? {a} : {b}; }}")

    @maker
    def bool_or():
        a, b = name(), name()
        return ("true when either flag is set",
                f"boolean anySet(boolean {a}, boolean {b}) {{ return {a} || {b}; }}")

    @maker
    def or_guard():
        v = name()
        return ("rejects out-of-range input",
                f"boolean reject(int {v}) {{\n"
                f"  if ({v} < {num(0, 5)} || {v} > {num(80, 120)}) {{ return true; }}\n"
                f"  return false;\n}}")

    @maker
    def new_array():
        a = arr()
        n = num(2, 16)
        return (f"allocates a fresh buffer of {n} slots",
                f"int[] make{a.capitalize()}() {{\n  int[] {a} = new int[{n}];\n"
                f"  {a}[0] = {num(1, 9)};\n  return {a};\n}}")

    @maker
    def new_array_init():
        t, suffix = rnd.choice([("int", ""), ("float", ".5f"), ("double", ".25")])
        vals = ", ".join(num(1, 9) + suffix for _ in range(rnd.randint(2, 5)))
        return ("returns the built-in defaults",
                f"{t}[] defaults() {{ return new {t}[]{{{vals}}}; }}")

    @maker
    def matrix_fill():
        r, c = num(2, 8), num(2, 8)
        return ("builds a multiplication table",
                f"int[][] table() {{\n  int[][] grid = new int[{r}][{c}];\n"
                f"  for (int i = 0; i < {r}; i++) {{\n"
                f"    for (int j = 0; j < {c}; j++) {{ grid[i][j] = i * j; }}\n"
                f"  }}\n  return grid;\n}}")

    @maker
    def switch_dispatch():
        v = name()
        return ("maps a small code to its weight",
                f"int weightOf(int {v}) {{\n  switch ({v}) {{\n"
                f"    case -1: return -{num(1, 9)};\n"
                f"    case 0: return 0;\n"
                f"    case {num(1, 3)}: break;\n"
                f"    default: return {num(10, 40)};\n  }}\n"
                f"  return {v};\n}}")

    @maker
    def try_parse():
        return ("parses the text, falling back to zero",
                "int parseOrZero(String text) {\n  try {\n"
                "    return Integer.parseInt(text.trim());\n"
                "  } catch (Exception error) {\n    return 0;\n  }\n}")

    @maker
    def foreach_concat():
        return ("joins the items with commas",
                "String joinAll(java.util.List<String> items) {\n"
                "  StringBuilder out = new StringBuilder();\n"
                "  for (String item : items) {\n"
                "    out.append(item);\n    out.append(\",\");\n  }\n"
                "  return out.toString();\n}")

    @maker
    def map_lookup():
        return ("fetches a count with a default",
                "Integer countFor(java.util.Map<String, Integer> counts, String key) {\n"
                "  return counts.containsKey(key) ? counts.get(key) : null;\n}")

    @maker
    def float_scale():
        f = name()
        return (f"scales {f} by a constant factor",
                f"float scale(float {f}) {{ return {f} * {num(2, 9)}.5f; }}")

    @maker
    def double_mean():
        a = arr()
        return ("average of the samples",
                f"double mean(double[] {a}) {{\n  double total = 0.0;\n"
                f"  for (int i = 0; i < {a}.length; i++) {{ total += {a}[i]; }}\n"
                f"  return total / {a}.length;\n}}")

    @maker
    def long_total():
        a, b = name(), name()
        return ("adds two wide counters",
                f"long combined(long {a}, long {b}) {{ return {a} + {b}; }}")

    @maker
    def long_cast():
        v = name()
        return ("widens before multiplying to avoid overflow",
                f"long area(int {v}) {{ long wide = (long) {v}; return wide * wide; }}")

    @maker
    def negate():
        b = name()
        return ("logical negation helper",
                f"boolean invert(boolean {b}) {{ return !{b}; }}")

    @maker
    def bit_flip():
        m = name()
        return ("complements the mask bits",
                f"int flip(int {m}) {{ return ~{m}; }}")

    @maker
    def not_guard():
        return ("appends only unseen items",
                "void addOnce(java.util.List<String> seen, String item) {\n"
                "  if (!seen.contains(item)) { seen.add(item); }\n}")

    @maker
    def clamp_chain():
        v = name()
        lo, hi = num(0, 9), num(50, 99)
        return ("clamps into the configured window",
                f"int clamp(int {v}) {{\n"
                f"  if ({v} < {lo}) {{ return {lo}; }}\n"
                f"  else if ({v} > {hi}) {{ return {hi}; }}\n"
                f"  else {{ return {v}; }}\n}}")

    @maker
    def true_flag():
        f = name()
        return ("marks the record dirty",
                f"boolean touch() {{ this.{f} = true; return true; }}")

    @maker
    def while_accumulate():
        n = name()
        return ("sums the integers below the bound",
                f"int sumBelow(int {n}) {{\n  int acc = 0;\n  int i = 0;\n"
                f"  while (i < {n}) {{ acc += i; i++; }}\n  return acc;\n}}")

    @maker
    def do_while_drain():
        # planned divergence: token rules count the do-while tail, the parse
        # tree does not; the plain while keeps the presence bit equal
        n = name()
        return ("drains the queue, always running at least once",
                f"int drain(int {n}) {{\n  int steps = 0;\n"
                f"  while (steps < {num(2, 5)}) {{ steps++; }}\n"
                f"  do {{ {n}--; steps++; }} while ({n} > 0);\n  return steps;\n}}")

    @maker
    def break_scan():
        a = arr()
        return ("stops at the first negative entry",
                f"int firstBad(int[] {a}) {{\n  int where = -1;\n"
                f"  for (int i = 0; i < {a}.length; i++) {{\n"
                f"    if ({a}[i] < 0) {{ where = i; break; }}\n  }}\n"
                f"  return where;\n}}")

    @maker
    def instance_guard():
        return ("stringifies known payload types",
                "String describe(Object payload) {\n"
                "  if (payload instanceof String) { return payload.toString(); }\n"
                "  return String.valueOf(payload);\n}")

    @maker
    def cast_ratio():
        a, b = name(), name()
        return ("exact ratio of two counters",
                f"double ratio(int {a}, int {b}) {{ return (double) {a} / {b}; }}")

    @maker
    def build_list():
        n = num(2, 6)
        return ("collects the first few labels",
                f"java.util.List<String> labels() {{\n"
                f"  java.util.List<String> out = new java.util.ArrayList<String>();\n"
                f"  for (int i = 0; i < {n}; i++) {{ out.add(\"label\" + i); }}\n"
                f"  return out;\n}}")

    @maker
    def ge_threshold():
        v = name()
        return ("threshold check used by the scheduler",
                f"boolean ready(long {v}) {{ return {v} >= {num(100, 999)}L; }}")

    @maker
    def nested_access():
        return ("reads the corner cells",
                "int corners(int[][] grid) {\n"
                "  int last = grid.length - 1;\n"
                "  return grid[0][0] + grid[last][grid[last].length - 1];\n}")

    @maker
    def throw_on_bad():
        v = name()
        return ("validates the argument before use",
                f"int checked(int {v}) {{\n"
                f"  if ({v} < 0) {{ throw new IllegalArgumentException(\"negative\"); }}\n"
                f"  return {v} * 2;\n}}")

    @maker
    def double_array_scan():
        a = arr()
        return ("finds the peak sample",
                f"double peak(double[] {a}) {{\n  double best = {a}[0];\n"
                f"  for (int i = 1; i < {a}.length; i++) {{\n"
                f"    if ({a}[i] > best) {{ best = {a}[i]; }}\n  }}\n"
                f"  return best;\n}}")

    @maker
    def string_repeat():
        n = num(2, 5)
        return ("repeats the separator a fixed number of times",
                f"String rule() {{\n  String out = \"\";\n  int i = 0;\n"
                f"  while (i < {n}) {{ out += \"-\"; i++; }}\n  return out;\n}}")

    return makers


def main():
    rnd = random.Random(20240817)
    makers = gen_methods(rnd)

    records = []
    # one of each first (covers the taxonomy), then a weighted random fill;
    # do-while stays a one-off so the known while-count divergence is a
    # realistic sliver, and plain while loops get extra weight
    for fn in makers:
        records.append(fn())
    no_dowhile = [f for f in makers if f.__name__ != "do_while_drain"]
    while_heavy = [f for f in makers
                   if f.__name__ in ("while_search", "while_accumulate", "string_repeat")]
    pool = no_dowhile + while_heavy * 2
    while len(records) < 240:
        records.append(rnd.choice(pool)())

    out_path = REPO / "tests" / "data" / "fixture_functions.jsonl"
    out_path.parent.mkdir(parents=True, exist_ok=True)

    presence_mismatches = 0
    kinds_seen = set()
    with out_path.open("w", encoding="utf-8") as fh:
        for i, (desc, code) in enumerate(records):
            ref = count_elements(code)
            got = element_histogram(code).to_dict()
            for kind, n in ref.items():
                if (n > 0) != (got.get(kind, 0) > 0):
                    presence_mismatches += 1
                    print(f"presence mismatch on {kind} in:\n{code}\n ref={ref}\n got={got}")
                if n > 0:
                    kinds_seen.add(kind)
            partition = "test" if rnd.random() < 0.15 else "train"
            fh.write(json.dumps({
                "id": f"fn{i:03d}",
                "partition": partition,
                "input": desc,
                "target": code,
            }, ensure_ascii=False) + "\n")

    assert presence_mismatches == 0, f"{presence_mismatches} presence mismatches"
    assert len(kinds_seen) == 13, f"taxonomy not covered: {sorted(kinds_seen)}"
    print(f"wrote {len(records)} methods to {out_path}; kinds covered: {len(kinds_seen)}")


if __name__ == "__main__":
    main()
