"""Expand the hand-transcribed differential equations into the JSON term
format read by the verifier.

Symbols: z, u; the unknown series and its derivatives are d0, d1, d2.
Run from this directory: python3 transcribe.py
"""
import json
import sympy as sp

z, u, d0, d1, d2 = sp.symbols("z u d0 d1 d2")

# Unknown F' (d0 = F', d1 = F'', d2 = F''').
A, B, C = d0, d1, d2
FPRIME_4 = (
    9*A**2*B**5*u**6 + 36*A**2*B**3*C*u**5*z + 144*A**2*B**4*u**5
    - 12*(21*z - 1)*A*B**5*u**5 + 432*A**2*B**2*C*u**4*z
    - 48*(24*z - 1)*A*B**3*C*u**4*z
    + 864*A**2*B**3*u**4 - 96*(27*z - 2)*A*B**4*u**4
    + 4*(27*z - 1)*(15*z - 1)*B**5*u**4 + 1728*A**2*B*C*u**3*z
    - 288*(21*z - 2)*A*B**2*C*u**3*z
    + 10368*A*C**2*u**2*z**3 + 16*(27*z - 1)*(21*z - 1)*B**3*C*u**3*z
    + 2304*A**2*B**2*u**3 - 288*(31*z - 4)*A*B**3*u**3
    - 64*(6*u*z - 162*z**2 + 33*z - 1)*B**4*u**3 + 2304*A**2*C*u**2*z
    - 2304*(6*z - 1)*A*B*C*u**2*z
    - 192*(8*u*z - 54*z**2 + 29*z - 1)*B**2*C*u**2*z
    - 768*(2*u + 189*z - 7)*C**2*u*z**3 + 2304*A**2*B*u**2
    - 3072*(3*z - 1)*A*B**2*u**2
    - 192*(24*u*z - 27*z**2 + 55*z - 2)*B**3*u**2
    - 1536*(21*z - 2)*A*C*u*z - 768*(12*u*z + 81*z**2 + 24*z - 1)*B*C*u*z
    + 1536*(9*z + 2)*A*B*u
    - 512*(39*u*z + 81*z**2 + 51*z - 2)*B**2*u + 36864*A*z
    - 1024*(12*u*z - 162*z**2 + 33*z - 1)*C*z
    - 1024*(36*u*z + 27*z - 1)*B - 24576*z
)

# Unknown H (d0 = H, d1 = H', d2 = H'').
H, H1, H2 = d0, d1, d2
H_4 = (
    3*(u + 1)*u**2*H1**2*H2 + 12*u**2*z*H1*H2 + 6*(u - 8)*u*H1**2 + 240*H
    + 4*(6*u*z - 54*z + 1)*H1 + 4*(3*u*z**2 + 30*u*H + 27*z**2 - z)*H2
    + 24*z**2
)

# Unknown W with G = (W + z/u)/2 (d0 = W, d1 = W', d2 = W'').
W, W1, W2 = d0, d1, d2
E = 5*W*u - u*z + z
W_3 = (
    (3*u**4*z*W1**4 - u**3*E*W1**3 + 4*(u + 1)*E**2)*W2
    - 48*u**2*z*(u + 1)*W1**3 + 8*u*(u + 1)*E*W1**2
    + 4*(u**2 - 1)*E*W1
)


def terms(expr):
    poly = sp.Poly(sp.expand(expr), z, u, d0, d1, d2)
    out = []
    for (ez, eu, e0, e1, e2), c in sorted(poly.terms()):
        derivs = [0]*e0 + [1]*e1 + [2]*e2
        out.append({"coeff": str(sp.Rational(c)), "z_pow": ez, "u_pow": eu, "derivs": derivs})
    return out


for name, expr in [("de_4valent_fprime", FPRIME_4), ("de_4valent_h", H_4), ("de_cubic_w", W_3)]:
    with open(f"{name}.json", "w") as fh:
        fh.write("[\n" + ",\n".join(" " + json.dumps(t) for t in terms(expr)) + "\n]\n")
    print(name, len(terms(expr)), "terms")
