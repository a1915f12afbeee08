/** Single base-URL + token setting, persisted in localStorage and overridable
 * via ?api= and ?token= query parameters. */

export interface UiConfig {
  baseUrl: string;
  token?: string;
  userId?: string;
}

const KEY = "moodgrid_ui_config_v1";

export function loadConfig(
  search: string = typeof window === "undefined" ? "" : window.location.search,
  storage: Pick<Storage, "getItem" | "setItem"> | null = typeof window === "undefined"
    ? null
    : window.localStorage,
): UiConfig {
  let config: UiConfig = { baseUrl: "http://127.0.0.1:8000" };
  const saved = storage?.getItem(KEY);
  if (saved) {
    try {
      config = { ...config, ...JSON.parse(saved) };
    } catch {
      /* ignore corrupt saved config */
    }
  }
  const params = new URLSearchParams(search);
  if (params.get("api")) config.baseUrl = params.get("api")!;
  if (params.get("token")) config.token = params.get("token")!;
  if (params.get("user")) config.userId = params.get("user")!;
  storage?.setItem(KEY, JSON.stringify(config));
  return config;
}

export function saveConfig(
  config: UiConfig,
  storage: Pick<Storage, "getItem" | "setItem"> | null = typeof window === "undefined"
    ? null
    : window.localStorage,
): void {
  storage?.setItem(KEY, JSON.stringify(config));
}
