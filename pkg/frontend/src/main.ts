import { bootstrap } from "./ui.js";

bootstrap(document, window);
