/**
 * Locale bundles: flat key -> string files. A key missing from the Arabic
 * bundle falls back to English and reports through the dev-warning hook so
 * gaps surface during development instead of silently shipping.
 */

import en from "./locales/en.json";
import ar from "./locales/ar.json";

export type UiLanguage = "en" | "ar";
export type Direction = "ltr" | "rtl";

const bundles: Record<UiLanguage, Record<string, string>> = { en, ar };

export type DevWarn = (message: string) => void;
let devWarn: DevWarn = () => {};

export function setDevWarn(fn: DevWarn): void {
  devWarn = fn;
}

export function t(key: string, language: UiLanguage): string {
  const bundle = bundles[language];
  const hit = bundle[key];
  if (hit !== undefined) return hit;
  if (language !== "en") {
    devWarn(`missing ${language} translation for "${key}"; falling back to en`);
    const fallback = bundles.en[key];
    if (fallback !== undefined) return fallback;
  }
  devWarn(`missing translation key "${key}"`);
  return key;
}

export function dir(language: UiLanguage): Direction {
  return language === "ar" ? "rtl" : "ltr";
}

export function bundleKeys(language: UiLanguage): string[] {
  return Object.keys(bundles[language]).sort();
}
