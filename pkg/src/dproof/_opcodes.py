"""Opcode numbering shared by the term compiler and both kernel backends.

A compiled term is a postorder instruction list: node i may only reference
nodes j < i, the last node is the root.  For each node, `arg_a`/`arg_b` hold
child indices, except VAR (arg_a = variable index), CONST (arg_a = constant
table index) and POWI (arg_b = signed integer exponent).
"""

VAR = 0
CONST = 1
ADD = 2
SUB = 3
MUL = 4
DIV = 5
NEG = 6
SQR = 7
POWI = 8
SQRT = 9
EXP = 10
LOG = 11
SIN = 12
COS = 13
TAN = 14
ASIN = 15
ACOS = 16
ATAN = 17
ATAN2 = 18
MIN = 19
MAX = 20
ABS = 21
# Internal envelope opcodes, produced only by differentiation with
# subdifferentials enabled.  SGN is the subdifferential of abs; CHMIN/CHMAX
# are indicator envelopes selecting the active branch of min/max.
SGN = 22
CHMIN = 23
CHMAX = 24

NAMES = {
    VAR: "var",
    CONST: "const",
    ADD: "+",
    SUB: "-",
    MUL: "*",
    DIV: "/",
    NEG: "neg",
    SQR: "sqr",
    POWI: "^",
    SQRT: "sqrt",
    EXP: "exp",
    LOG: "log",
    SIN: "sin",
    COS: "cos",
    TAN: "tan",
    ASIN: "asin",
    ACOS: "acos",
    ATAN: "atan",
    ATAN2: "atan2",
    MIN: "min",
    MAX: "max",
    ABS: "abs",
    SGN: "$sgn",
    CHMIN: "$chmin",
    CHMAX: "$chmax",
}

UNARY = {NEG, SQR, SQRT, EXP, LOG, SIN, COS, TAN, ASIN, ACOS, ATAN, ABS, SGN}
BINARY = {ADD, SUB, MUL, DIV, ATAN2, MIN, MAX, CHMIN, CHMAX}
