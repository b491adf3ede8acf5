// Keyboard shortcuts: left/right arrows pick a side, space is neutral.

import type { Outcome } from "./types.js";

const KEY_OUTCOMES: Record<string, Outcome> = {
  ArrowLeft: "LEFT",
  ArrowRight: "RIGHT",
  " ": "NEUTRAL",
};

export function outcomeForKey(key: string): Outcome | null {
  return KEY_OUTCOMES[key] ?? null;
}

export function bindKeyboard(
  target: Pick<EventTarget, "addEventListener">,
  onOutcome: (outcome: Outcome) => void,
): void {
  target.addEventListener("keydown", (event) => {
    const key = (event as KeyboardEvent).key;
    const outcome = outcomeForKey(key);
    if (outcome !== null) {
      event.preventDefault();
      onOutcome(outcome);
    }
  });
}
