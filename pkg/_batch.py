import sys, time, signal, statistics
sys.path.insert(0, "tests")
from collections import Counter
from corpus import composed_cut_proofs
from focusce.prooftree import check_proof, iter_nodes
from focusce.cutelim import eliminate_cuts

class Timeout(Exception):
    pass

def alarm(sig, frm):
    raise Timeout()

signal.signal(signal.SIGALRM, alarm)

times, fails = [], []
cases = composed_cut_proofs(100)
print("generated", len(cases), flush=True)
for i, (cut, left, right, psi) in enumerate(cases):
    t0 = time.time()
    signal.alarm(30)
    try:
        out = eliminate_cuts(cut)
        ok = check_proof(out).ok and \
            not any(n.rule == "cut" for n in iter_nodes(out)) and \
            Counter(out.sequent) == Counter(cut.sequent)
        if not ok:
            fails.append((i, "bad-output"))
    except Timeout:
        fails.append((i, "timeout-30s"))
    except Exception as e:
        fails.append((i, repr(e)[:300]))
    finally:
        signal.alarm(0)
    dt = time.time() - t0
    times.append(dt)
    if dt > 1:
        print("slow case", i, "%.1fs" % dt, flush=True)
print("median: %.4fs max: %.2fs fails: %d"
      % (statistics.median(times), max(times), len(fails)), flush=True)
for f in fails[:10]:
    print("  ", f, flush=True)
