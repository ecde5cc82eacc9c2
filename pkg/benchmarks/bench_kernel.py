#!/usr/bin/env python3
"""Compare the compiled kernel against the pure-Python path.

Usage: python benchmarks/bench_kernel.py [--n 65536] [--repeat 3]
"""

import argparse
import time

from etac import backend
from etac.codec import decode_payload_pure, encode_payload_pure
from etac.envelope import PowerEnvelope, geometric_source


def best_of(repeat, fn, *args):
    best = float("inf")
    result = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        result = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, result


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--n", type=int, default=65536)
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()

    if not backend.USING_KERNEL:
        print("compiled kernel not available; nothing to compare")
        return 1
    from etac import _kernel

    workloads = {
        "power(alpha=2) envelope": PowerEnvelope(alpha=2.0).envelope_source(),
        "geometric(q=0.5)": geometric_source(0.5),
    }
    print(f"{'workload':28} {'path':6} {'encode':>10} {'decode':>10} {'sym/s':>12}")
    for name, source in workloads.items():
        msg = source.sample(args.n, seed=1234).tolist()
        te_k, (payload, nbits, _) = best_of(args.repeat, _kernel.encode_message, msg, False)
        td_k, decoded = best_of(args.repeat, _kernel.decode_message, payload, False)
        assert decoded == msg
        te_p, (payload_p, nbits_p, _) = best_of(args.repeat, encode_payload_pure, msg, False)
        td_p, decoded_p = best_of(args.repeat, decode_payload_pure, payload_p, False)
        assert decoded_p == msg
        assert (payload_p, nbits_p) == (payload, nbits), "paths must agree bit for bit"
        print(f"{name:28} {'kernel':6} {te_k:9.3f}s {td_k:9.3f}s {args.n / te_k:12.0f}")
        print(f"{name:28} {'pure':6} {te_p:9.3f}s {td_p:9.3f}s {args.n / te_p:12.0f}")
        print(f"{name:28} {'':6} encode speedup x{te_p / te_k:.1f}, decode speedup x{td_p / td_k:.1f}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
