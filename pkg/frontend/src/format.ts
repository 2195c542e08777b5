/** Display formatting. Rounding here is presentation only; the underlying
 * full-precision service value rides along in the title attribute.
 */

export function fixed3(value: number): string {
  return value.toFixed(3);
}

/** A span showing a service number at 3 decimals, full precision on hover. */
export function numberSpan(value: number, extraClass?: string): HTMLSpanElement {
  const span = document.createElement("span");
  span.className = extraClass ? `num ${extraClass}` : "num";
  span.textContent = fixed3(value);
  span.title = String(value);
  return span;
}
