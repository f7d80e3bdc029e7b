"""Recurrent shot captioning with the deterministic hash mock.

The mock client digests its exact inputs, so the demo makes the recurrence
visible: changing a keyframe in shot 2 ripples into every later caption
when the memory is threaded through, but only touches shot 2 itself when
memory is disabled.
"""

from clipsearch.recap import HashMockLVLM, Shot, caption_shots

def make_shots(tag=""):
    shots = []
    for i in range(6):
        frames = (f"kf-{i}-a", f"kf-{i}-b")
        if i == 2 and tag:
            frames = (f"kf-{i}-a{tag}", f"kf-{i}-b")
        shots.append(Shot(i, "vid", frames, f"subtitle for shot {i}",
                          i * 4000, i * 4000 + 3999))
    return shots

mock = HashMockLVLM()

base, failures = caption_shots(make_shots(), mock)
assert not failures
print("baseline captions")
for r in base:
    print(f"  shot {r.shot_index}: {r.caption}  (memory {len(r.memory.text)} chars)")

changed, _ = caption_shots(make_shots(tag="-EDITED"), mock)
print("\nwith shot 2 perturbed, memory ON (changes propagate forward)")
for a, b in zip(base, changed):
    mark = "  <- changed" if a.caption != b.caption else ""
    print(f"  shot {b.shot_index}: {b.caption}{mark}")

base_nm, _ = caption_shots(make_shots(), mock, use_memory=False)
changed_nm, _ = caption_shots(make_shots(tag="-EDITED"), mock, use_memory=False)
print("\nsame perturbation, memory OFF (change stays local)")
for a, b in zip(base_nm, changed_nm):
    mark = "  <- changed" if a.caption != b.caption else ""
    print(f"  shot {b.shot_index}: {b.caption}{mark}")
