// Keyboard-first bindings: digits toggle label checkboxes, Enter submits.

export type KeyAction =
  | { kind: "toggle"; index: number }
  | { kind: "submit" }
  | { kind: "none" };

interface KeyLike {
  key: string;
  target?: unknown;
}

function isTypingTarget(target: unknown): boolean {
  if (typeof HTMLElement === "undefined" || !(target instanceof HTMLElement)) {
    return false;
  }
  return target.tagName === "INPUT" && (target as HTMLInputElement).type === "text"
    || target.tagName === "TEXTAREA";
}

/**
 * Map a key press to an action. Keys 1..9 address labels 1..9 and 0 addresses
 * label 10; presses outside the label count are ignored.
 */
export function keyToAction(event: KeyLike, labelCount: number): KeyAction {
  if (isTypingTarget(event.target)) return { kind: "none" };
  if (event.key === "Enter") return { kind: "submit" };
  if (/^[0-9]$/.test(event.key)) {
    const index = event.key === "0" ? 9 : Number(event.key) - 1;
    if (index < labelCount) return { kind: "toggle", index };
  }
  return { kind: "none" };
}
