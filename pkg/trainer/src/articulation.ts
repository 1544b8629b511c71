/** Simulated phonology: even characters may not neighbor even characters,
 * odd may not neighbor odd.  The training penalty is epsilon times the
 * number of violating adjacent pairs, which must agree exactly with the
 * measurement toolkit's articulation_score (cross-component invariant). */

export function violations(message: number[]): number {
  let count = 0;
  for (let i = 1; i < message.length; i++) {
    if (message[i - 1] % 2 === message[i] % 2) count += 1;
  }
  return count;
}

export function articulationLoss(message: number[], epsilon: number): number {
  return epsilon * violations(message);
}

export function violationRate(message: number[]): number {
  if (message.length < 2) return 0;
  return violations(message) / (message.length - 1);
}

export function meanViolationRate(messages: number[][]): number {
  let total = 0;
  for (const m of messages) total += violationRate(m);
  return total / messages.length;
}
