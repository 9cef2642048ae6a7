/** Collision badge state machine.
 *
 * States: none (never checked), running (job in flight), clean (empty report
 * for the current version), colliding (events for the current version), and
 * stale (mechanism edited after the last finished check).  Edits during a
 * run also lead to stale so outdated results are impossible to mistake for
 * current ones.
 */

export type BadgeState = "none" | "running" | "clean" | "colliding" | "stale";

export type BadgeEvent =
  | { type: "check_started" }
  | { type: "check_finished"; collisions: number; versionAtStart: number; currentVersion: number }
  | { type: "edited" }
  | { type: "check_failed" };

export function badgeTransition(state: BadgeState, ev: BadgeEvent): BadgeState {
  switch (ev.type) {
    case "check_started":
      return "running";
    case "check_finished":
      if (ev.versionAtStart !== ev.currentVersion) return "stale";
      return ev.collisions > 0 ? "colliding" : "clean";
    case "edited":
      if (state === "clean" || state === "colliding" || state === "running") return "stale";
      return state;
    case "check_failed":
      return state === "running" ? "none" : state;
  }
}

export const badgeLabels: Record<BadgeState, string> = {
  none: "not checked",
  running: "checking…",
  clean: "collision-free",
  colliding: "collisions!",
  stale: "outdated — re-check",
};
