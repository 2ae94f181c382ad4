#!/usr/bin/env python3
"""Writes the frozen Justesen vectors (n = 1024, c = 3).

Independent of the C++ encoder: field arithmetic is shift-and-add
multiplication modulo the first primitive polynomial of degree k.
Run once; the outputs are committed.
"""
import struct
import sys
from pathlib import Path


def poly_mulmod(a, b, poly, k):
    r = 0
    while b:
        if b & 1:
            r ^= a
        b >>= 1
        a <<= 1
        if a >> k:
            a ^= poly
    return r


def is_primitive(poly, k):
    # x must have multiplicative order exactly 2^k - 1.
    order = (1 << k) - 1
    x, seen = 1, 0
    for i in range(1, order + 1):
        x = poly_mulmod(x, 2, poly, k)
        if x == 1:
            seen = i
            break
    return seen == order


def first_primitive(k):
    for poly in range((1 << k) | 1, 1 << (k + 1), 2):
        if is_primitive(poly, k):
            return poly
    raise ValueError(k)


def layout(n, c):
    for k in range(2, 17):
        big_n = (1 << k) - 1
        big_k = int(2 * big_n / c + 0.5)
        if 1 <= big_k < big_n and big_k * k >= n:
            return k, big_n, big_k
    raise ValueError((n, c))


def encode(bits, n, c):
    k, big_n, big_k = layout(n, c)
    poly = first_primitive(k)
    bits = bits + [0] * (big_k * k - len(bits))
    msg = []
    for j in range(big_k):
        s = 0
        for b in bits[j * k:(j + 1) * k]:
            s = (s << 1) | b
        msg.append(s)
    out = []
    point = 1
    for i in range(big_n):
        value = 0
        for coef in reversed(msg):
            value = poly_mulmod(value, point, poly, k) ^ coef
        beta = i + 1
        for sym in (value, poly_mulmod(beta, value, poly, k)):
            out.extend((sym >> (k - 1 - b)) & 1 for b in range(k))
        point = poly_mulmod(point, 2, poly, k)
    return out


def to_qfp1(bits):
    payload = bytearray((len(bits) + 7) // 8)
    for i, b in enumerate(bits):
        if b:
            payload[i // 8] |= 0x80 >> (i % 8)
    return b"QFP1" + struct.pack("<Q", len(bits)) + bytes(payload)


def main():
    out_dir = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(__file__).parent
    data = bytes((j * 131 + 7) & 0xFF for j in range(128))
    bits = [(byte >> (7 - b)) & 1 for byte in data for b in range(8)]
    (out_dir / "justesen_n1024_c3_input.qfp").write_bytes(to_qfp1(bits))
    (out_dir / "justesen_n1024_c3_codeword.qfp").write_bytes(to_qfp1(encode(bits, 1024, 3.0)))
    # Second vector: a single 1 in the last input bit.
    single = [0] * 1024
    single[-1] = 1
    (out_dir / "justesen_n1024_c3_unit_input.qfp").write_bytes(to_qfp1(single))
    (out_dir / "justesen_n1024_c3_unit_codeword.qfp").write_bytes(to_qfp1(encode(single, 1024, 3.0)))
    print(" ".join(hex(first_primitive(k)) for k in range(2, 17)))


if __name__ == "__main__":
    main()
