import type { Choice, PairView, Progress, SubmitOutcome } from './types.js';

// Thin client over the annotation service API. A 204 on next-pair means the
// queue is exhausted; 404/409 on label are expected flow outcomes, not
// transport errors, so they come back as typed results.

export async function fetchNextPair(baseUrl = ''): Promise<PairView | null> {
  const response = await fetch(`${baseUrl}/api/pairs/next`);
  if (response.status === 204) {
    return null;
  }
  if (!response.ok) {
    throw new Error(`next-pair failed: ${response.status}`);
  }
  return (await response.json()) as PairView;
}

export async function submitLabel(
  pairId: string,
  choice: Choice,
  baseUrl = ''
): Promise<SubmitOutcome> {
  const response = await fetch(`${baseUrl}/api/pairs/${encodeURIComponent(pairId)}/label`, {
    method: 'POST',
    headers: { 'Content-Type': 'application/json' },
    body: JSON.stringify({ choice })
  });
  if (response.status === 409) {
    return { kind: 'conflict' };
  }
  if (response.status === 404) {
    return { kind: 'unknown_pair' };
  }
  if (!response.ok) {
    throw new Error(`label failed: ${response.status}`);
  }
  const body = await response.json();
  return { kind: 'ok', mu: body.mu as [number, number] };
}

export async function fetchProgress(baseUrl = ''): Promise<Progress> {
  const response = await fetch(`${baseUrl}/api/progress`);
  if (!response.ok) {
    throw new Error(`progress failed: ${response.status}`);
  }
  return (await response.json()) as Progress;
}
