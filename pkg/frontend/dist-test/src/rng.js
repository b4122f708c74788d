// Small deterministic PRNG (mulberry32) so a ?seed= query parameter fully
// fixes the target sequence.
export function mulberry32(seed) {
    let a = seed >>> 0;
    return () => {
        a = (a + 0x6d2b79f5) >>> 0;
        let t = a;
        t = Math.imul(t ^ (t >>> 15), t | 1);
        t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
        return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
    };
}
export function uniform(rng, lo, hi) {
    return lo + (hi - lo) * rng();
}
