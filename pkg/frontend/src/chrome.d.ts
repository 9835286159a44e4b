/** Minimal surface of the extension APIs this project touches. */

declare namespace chrome {
  namespace storage {
    interface LocalArea {
      get(key: string): Promise<Record<string, unknown>>;
      set(items: Record<string, unknown>): Promise<void>;
    }
    const local: LocalArea;
  }
  namespace runtime {
    function sendMessage(message: unknown): Promise<unknown>;
    const onMessage: {
      addListener(
        handler: (
          message: unknown,
          sender: unknown,
          sendResponse: (response: unknown) => void,
        ) => boolean | void,
      ): void;
    };
    const lastError: { message?: string } | undefined;
  }
  namespace tabs {
    function query(info: { active: boolean; currentWindow: boolean }): Promise<
      Array<{ id?: number; url?: string }>
    >;
    function sendMessage(tabId: number, message: unknown): Promise<unknown>;
  }
}
