// ...
type getSteam2RenderedID = (newerFormat?: boolean) => string;

declare class SteamID {
    // ...
    isValid(): boolean;
    // ...
    isGroupChat(): boolean;
    // ...
    isLobby(): boolean;
    getSteam2RenderedID: getSteam2RenderedID;
    // ...
}

declare namespace SteamID {
    // ...
    function fromIndividualAccountID(accountid: number | string): SteamID;
}

export = SteamID;
