/**
 * View -> render description. Kept DOM-free so the automated UI tests can
 * assert on rendered output directly; main.ts maps this to real elements.
 */

import { t, UiLanguage } from "./i18n";
import { ViewState } from "./viewmodel";

export interface RenderedStep {
  id: string;
  label: string;
  badgeText: string;
  badgeClass: string;
  level: number;
}

export interface RenderedView {
  title: string;
  direction: "ltr" | "rtl";
  connectionLabel: string;
  messages: { role: string; content: string }[];
  planHeading: string;
  steps: RenderedStep[];
  approvalModal: {
    visible: boolean;
    heading: string;
    description: string;
    approveLabel: string;
    denyLabel: string;
    digest: string;
  };
  banner: string | null;
  draft: string;
  scrollPosition: number;
  languageToggleLabel: string;
}

export function render(view: ViewState): RenderedView {
  const lang: UiLanguage = view.language;
  const approval = view.pendingApprovals[0];
  const banner =
    view.workflowStatus === "cancelled"
      ? t("workflow.cancelled", lang)
      : view.workflowStatus === "closed"
        ? t("workflow.closed", lang)
        : null;
  return {
    title: t("app.title", lang),
    direction: view.direction,
    connectionLabel: t(`connection.${view.connection}`, lang),
    messages: view.messages.map((m) => ({ role: m.role, content: m.content })),
    planHeading: t("plan.heading", lang),
    steps: view.planSteps.map((s) => ({
      id: s.id,
      label: s.description,
      badgeText: t(`badge.${s.badge}`, lang),
      badgeClass: `badge badge-${s.badge}`,
      level: s.level,
    })),
    approvalModal: {
      visible: approval !== undefined,
      heading: t("approval.heading", lang),
      description: approval?.description ?? "",
      approveLabel: t("approval.approve", lang),
      denyLabel: t("approval.deny", lang),
      digest: approval?.digest ?? "",
    },
    banner,
    draft: view.draft,
    scrollPosition: view.scrollPosition,
    languageToggleLabel: t("language.toggle", lang),
  };
}
