package main

import (
	"context"
	"os"

	"cloud.google.com/go/storage"
)

func Handler(ctx context.Context, day string, line []byte) error {
	client, err := storage.NewClient(ctx)
	if err != nil {
		return err
	}
	name := "logs/" + day + ".txt"
	w := client.Bucket(os.Getenv("LOG_BUCKET")).Object(name).NewWriter(ctx)
	_, err = w.Write(line)
	return err
}
