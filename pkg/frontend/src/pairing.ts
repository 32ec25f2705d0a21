/**
 * QR pairing intake: accepts a raw token or an autonoma://pair link. The
 * token lives in session storage only — closing the tab forgets it.
 */

const STORAGE_KEY = "autonoma.pairing";

export interface PairingInfo {
  token: string;
  host?: string;
  port?: number;
}

export function parsePairingInput(raw: string): PairingInfo | null {
  const text = raw.trim();
  if (!text) return null;
  if (text.startsWith("autonoma://pair?")) {
    const params = new URLSearchParams(text.slice("autonoma://pair?".length));
    const token = params.get("token");
    if (!token) return null;
    const port = params.get("port");
    return {
      token,
      host: params.get("host") ?? undefined,
      port: port ? Number(port) : undefined,
    };
  }
  return { token: text };
}

export interface StorageLike {
  getItem(key: string): string | null;
  setItem(key: string, value: string): void;
  removeItem(key: string): void;
}

export function savePairing(storage: StorageLike, info: PairingInfo): void {
  storage.setItem(STORAGE_KEY, JSON.stringify(info));
}

export function loadPairing(storage: StorageLike): PairingInfo | null {
  const raw = storage.getItem(STORAGE_KEY);
  if (!raw) return null;
  try {
    const parsed = JSON.parse(raw);
    return typeof parsed.token === "string" ? parsed : null;
  } catch {
    return null;
  }
}

export function clearPairing(storage: StorageLike): void {
  storage.removeItem(STORAGE_KEY);
}
