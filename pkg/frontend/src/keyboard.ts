import type { Choice } from './types.js';

// Keyboard shortcuts mirror the buttons: left-arrow = left, right-arrow =
// right, "t" = tie. Everything else is ignored.
export function choiceForKey(key: string): Choice | null {
  switch (key) {
    case 'ArrowLeft':
      return 'left';
    case 'ArrowRight':
      return 'right';
    case 't':
    case 'T':
      return 'tie';
    default:
      return null;
  }
}
