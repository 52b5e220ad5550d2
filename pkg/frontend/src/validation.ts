// Client-side form validation. The tau check mirrors the service's
// accept/reject decision exactly (same formulas, same IEEE arithmetic);
// tests/fixtures/tau_cases.json pins both sides to one table.

export type TauVerdict = { ok: true } | { ok: false; message: string };

export function validTauInterval(
  m: number,
  h: number,
  keepBoundary: boolean,
): string {
  if (keepBoundary) {
    const bound = 1 - m / h;
    return `0 < tau < 1 - m/H = ${bound.toPrecision(4)}`;
  }
  return "0 < tau < 1";
}

export function validateTau(
  m: number,
  h: number,
  tau: number,
  keepBoundary: boolean,
): TauVerdict {
  if (!Number.isFinite(tau)) {
    return { ok: false, message: "tau must be a number" };
  }
  if (h <= m) {
    return {
      ok: false,
      message:
        `the closed-form exponent needs H > m (got m=${m}, H=${h}); ` +
        "use the multi-layer contraction for boundary-only lattices",
    };
  }
  if (keepBoundary) {
    const bound = 1 - m / h;
    const atIdentity = Math.abs(tau - bound) <= 1e-12;
    if (!(tau > 0 && tau < bound) && !atIdentity) {
      return {
        ok: false,
        message:
          `Corollary 1: keep-boundary mapping needs 0 < tau < 1 - m/H = ` +
          `${bound.toPrecision(6)} (tau = 1 - m/H exactly is accepted as the ` +
          "whole-front identity)",
      };
    }
    return { ok: true };
  }
  if (!(tau > 0 && tau < 1)) {
    return {
      ok: false,
      message: "Corollary 3: shift-all mapping needs 0 < tau < 1",
    };
  }
  return { ok: true };
}

export type VectorVerdict =
  | { ok: true; values: number[] }
  | { ok: false; message: string };

/** Parse an aspiration vector typed as comma- or space-separated numbers. */
export function parseAspiration(text: string, m: number): VectorVerdict {
  const parts = text
    .split(/[\s,;]+/)
    .map((p) => p.trim())
    .filter((p) => p.length > 0);
  if (parts.length !== m) {
    return {
      ok: false,
      message: `expected ${m} components, got ${parts.length}`,
    };
  }
  const values = parts.map(Number);
  if (values.some((v) => !Number.isFinite(v))) {
    return { ok: false, message: "every component must be a finite number" };
  }
  return { ok: true, values };
}

export function validateGenerations(value: number): TauVerdict {
  if (!Number.isInteger(value) || value < 0) {
    return { ok: false, message: "generations must be a non-negative integer" };
  }
  return { ok: true };
}
